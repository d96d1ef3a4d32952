from .settings import ConfigValidationError, Settings, load_config, save_config

__all__ = ['ConfigValidationError', 'Settings', 'load_config', 'save_config']
