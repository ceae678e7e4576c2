# Launchers for the ar_bridge command-line tools
