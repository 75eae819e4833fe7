from hypothesis import settings

# Property tests must give the same verdict on every run.
settings.register_profile("repro", derandomize=True, deadline=None, max_examples=200)
settings.load_profile("repro")
