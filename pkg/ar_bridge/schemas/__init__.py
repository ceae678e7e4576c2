# Pydantic schemas for configuration documents and serialized results
