"""Joint routing and resource allocation with mutual information accumulation."""
