from hypothesis import settings

# fixed example database-free profile so runs are reproducible
settings.register_profile("repro", derandomize=True, deadline=None, max_examples=100)
settings.load_profile("repro")
