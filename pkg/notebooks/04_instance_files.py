# %% [markdown]
# # Instance files
#
# Instances are JSON documents. Missing optional fields take defaults, and
# errors point at the offending field.

# %%
from acoroute import GeneratorConfig, generate_instance, parse_instance, serialize_instance
from acoroute.errors import ParseError

text = serialize_instance(generate_instance(GeneratorConfig(3, 1, seed=42)))
print(text)
assert parse_instance(text) == generate_instance(GeneratorConfig(3, 1, seed=42))

# %%
minimal = '{"customers": [{"id": 1, "x": 3, "y": 4}], "depots": [{"id": 2, "x": 0, "y": 0}]}'
print(parse_instance(minimal))

for bad in ['{"customers": [{"id": 1, "x": "3", "y": 4}], "depots": []}', "{nope"]:
    try:
        parse_instance(bad)
    except ParseError as exc:
        print(exc.code, exc.where)
