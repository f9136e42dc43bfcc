# Command orchestration shared by the CLI and HTTP routers
