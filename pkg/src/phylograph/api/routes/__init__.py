"""HTTP controllers, one router per resource family."""

from . import analyses, health, profiles, projects

ALL_ROUTERS = (health.router, projects.router, profiles.router,
               analyses.router)

__all__ = ["ALL_ROUTERS", "analyses", "health", "profiles", "projects"]
