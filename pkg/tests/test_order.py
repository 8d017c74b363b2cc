import pytest

from conftest import line_network, two_node
from mia_routing.network import Traffic, diamond_network
from mia_routing.order import (DecodingOrder, IllegalSwapError, NotInOrderError, OrderError,
                               ProtectedEventError, apply_drop, apply_swap, check_swap,
                               init_multi_packet_order, init_single_packet_order, order_from_lists)

SEQ4 = ((1, 1), (2, 1), (3, 1), (4, 1))


def o4():
    return DecodingOrder(SEQ4, 4, (0.0,))


def test_position_of():
    assert o4().position_of(2, 1) == 2
    assert o4().position_of(1, 1) == 1
    multi = init_multi_packet_order(init_single_packet_order(diamond_network()), Traffic.single_file(20, 2))
    assert multi.position_of(3, 2) == 6
    with pytest.raises(NotInOrderError):
        o4().position_of(2, 2)


def test_init_single():
    assert init_single_packet_order(diamond_network()).events == SEQ4
    assert init_single_packet_order(two_node()).events == ((1, 1), (2, 1))
    # all efficiencies equal: ties go to the lowest label
    assert init_single_packet_order(line_network(1, 1, 1)).events == ((1, 1), (2, 1), (3, 1))


def test_init_multi():
    single = init_single_packet_order(diamond_network())
    multi = init_multi_packet_order(single, Traffic.single_file(20, 2))
    assert multi.events == ((1, 1), (1, 2), (2, 1), (2, 2), (3, 1), (3, 2), (4, 1), (4, 2))
    assert init_multi_packet_order(single, Traffic.single_file(20, 1)).events == single.events
    two = init_multi_packet_order(init_single_packet_order(two_node()), Traffic.single_file(9, 3))
    assert two.events == ((1, 1), (1, 2), (1, 3), (2, 1), (2, 2), (2, 3))
    assert len(multi) == 2 * len(single)


def test_swap():
    assert apply_swap(o4(), 3).events == ((1, 1), (3, 1), (2, 1), (4, 1))
    assert apply_swap(apply_swap(o4(), 3), 3) == o4()
    tail = DecodingOrder(((1, 1), (4, 1)), 4, (0.0,))
    with pytest.raises(IllegalSwapError):
        apply_swap(tail, 2)
    staggered = DecodingOrder(((1, 1), (1, 2), (2, 1), (2, 2)), 2, (0.0, 1.0))
    assert check_swap(staggered, 2) is not None
    with pytest.raises(IllegalSwapError):
        apply_swap(staggered, 2)
    same = DecodingOrder(((1, 1), (1, 2), (2, 1), (2, 2)), 2, (0.0, 0.0))
    assert apply_swap(same, 2).events[:2] == ((1, 2), (1, 1))


def test_swap_relay_before_availability_refused():
    order = DecodingOrder(((1, 1), (2, 1), (1, 2), (2, 2), (3, 1), (3, 2)), 3, (0.0, 0.0))
    with pytest.raises(IllegalSwapError):
        apply_swap(order, 4)  # (2, 2) ahead of its own availability event
    assert apply_swap(order, 3).events[1:3] == ((1, 2), (2, 1))


def test_drop():
    assert apply_drop(o4(), 3).events == ((1, 1), (2, 1), (4, 1))
    with pytest.raises(ProtectedEventError):
        apply_drop(o4(), 1)
    with pytest.raises(ProtectedEventError):
        apply_drop(o4(), 4)


@pytest.mark.parametrize("events,arrivals", [
    (((1, 1), (1, 1), (2, 1)), (0.0,)),            # duplicate
    (((1, 1), (3, 1)), (0.0,)),                    # node out of range for L=2
    (((1, 1),), (0.0,)),                           # no destination event
    (((2, 1), (1, 1)), (0.0,)),                    # destination before availability
    (((1, 2), (1, 1), (2, 1), (2, 2)), (0.0, 1.0)),  # sources out of arrival order
])
def test_validate_rejects(events, arrivals):
    with pytest.raises(OrderError):
        DecodingOrder(events, 2, arrivals)


def test_order_from_lists():
    o = order_from_lists([[1, 1], [2, 1]], 2, [0])
    assert o.events == ((1, 1), (2, 1)) and o.arrivals == (0.0,)
