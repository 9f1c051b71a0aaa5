from hypothesis import settings

# fixed example sequence so that every run checks the same instances
settings.register_profile("repo", derandomize=True, deadline=None)
settings.load_profile("repo")
