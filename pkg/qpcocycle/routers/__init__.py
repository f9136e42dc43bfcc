# API route handlers
