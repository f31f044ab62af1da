"""Validate sample and resolved configs against the published schema."""
import glob
import json
import subprocess
import sys
import tempfile
from pathlib import Path

import jsonschema

root = Path(sys.argv[1])
binary = sys.argv[2]
schema = json.loads((root / "schema" / "run_config.schema.json").read_text())
jsonschema.Draft202012Validator.check_schema(schema)
validator = jsonschema.Draft202012Validator(schema)

failures = 0
with tempfile.TemporaryDirectory() as tmp:
    for path in sorted(glob.glob(str(root / "tools" / "configs" / "*.json"))):
        config = json.loads(Path(path).read_text())
        errors = [e.message for e in validator.iter_errors(config)]
        out = Path(tmp) / Path(path).stem
        subprocess.run([binary, "check", "--config", path, "--out", str(out)],
                       env={"INCOMPAT_LOG": "quiet"}, capture_output=True)
        resolved = out / "resolved_config.json"
        if resolved.exists():
            errors += ["resolved: " + e.message for e in validator.iter_errors(json.loads(resolved.read_text()))]
        else:
            errors.append("no resolved config written")
        print(f"{Path(path).name}: {'ok' if not errors else errors}")
        failures += bool(errors)

    bad = Path(tmp) / "bad.json"
    bad.write_text(json.dumps({"resolution": [8, 8], "colour": "red"}))
    rc = subprocess.run([binary, "check", "--config", str(bad)], env={"INCOMPAT_LOG": "quiet"},
                        capture_output=True).returncode
    schema_rejects = not validator.is_valid(json.loads(bad.read_text()))
    print(f"invalid config: exit {rc}, schema rejects: {schema_rejects}")
    failures += rc != 1 or not schema_rejects

sys.exit(1 if failures else 0)
