"""JSON models for the LDOI toolkit."""
