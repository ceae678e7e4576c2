# Autoregressive order selection toolkit built around the bridge criterion
