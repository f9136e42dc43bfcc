# Pydantic request and report models
