# API routes and endpoints
