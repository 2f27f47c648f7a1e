"""Validate every line of an NDJSON index against schema/index-entry.schema.json."""
import json
import sys

import jsonschema


def main(schema_path, index_path):
    with open(schema_path, encoding="utf-8") as f:
        schema = json.load(f)
    validator = jsonschema.Draft202012Validator(schema)
    count = 0
    with open(index_path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            if not line.strip():
                continue
            errors = sorted(validator.iter_errors(json.loads(line)), key=str)
            if errors:
                print(f"{index_path}:{lineno}: {errors[0].message}")
                return 1
            count += 1
    print(f"{count} entries valid")
    return 0 if count else 1


if __name__ == "__main__":
    sys.exit(main(sys.argv[1], sys.argv[2]))
