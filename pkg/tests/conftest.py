from hypothesis import settings

# exact arithmetic is slow and timings vary on shared machines
settings.register_profile("exact", deadline=None, max_examples=50)
settings.load_profile("exact")
