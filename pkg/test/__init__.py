# Tests package for the MCP human handoff server.

