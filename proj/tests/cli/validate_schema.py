"""Validate emitted report JSON against the shipped schemas.

usage: validate_schema.py SCHEMA_DIR REPORT.json [REPORT.json ...]
The schema is chosen by metadata.kind.
"""
import json
import pathlib
import sys

import jsonschema


def main(argv):
    schema_dir = pathlib.Path(argv[1])
    for path in argv[2:]:
        doc = json.loads(pathlib.Path(path).read_text(encoding="utf-8"))
        kind = doc["metadata"]["kind"]
        schema = json.loads((schema_dir / f"{kind}.schema.json").read_text(encoding="utf-8"))
        jsonschema.Draft202012Validator.check_schema(schema)
        jsonschema.Draft202012Validator(schema).validate(doc)
        print(f"{path}: valid {kind} v{doc['metadata']['schema_version']}")
    return 0


if __name__ == "__main__":
    sys.exit(main(sys.argv))
