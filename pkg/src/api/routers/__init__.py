# Decision service routers
