class ConfigurationError(ValueError):
    """Invalid code, channel, or decoder parameters."""
