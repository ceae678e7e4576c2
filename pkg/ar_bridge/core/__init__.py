# Core configuration and settings
