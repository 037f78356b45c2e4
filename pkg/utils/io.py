import os
import json

from utils.errors import FormatError

def load_json(file_path):
    with open(file_path) as f:
        data = json.load(f)
    return data

def write_json(file_path, data):
    with open(file_path, 'w') as outfile:
        json.dump(data, outfile, indent=4, sort_keys=True)

def make_dir_if_not_exists(path):
    if path and not os.path.isdir(path):
        os.makedirs(path)

def sidecar_path(file_path):
    return file_path + ".meta"

def write_sidecar(file_path, fields):
    with open(sidecar_path(file_path), 'w') as f:
        for key, value in fields.items():
            f.write(f"{key}={value}\n")

def read_sidecar(file_path, required=()):
    path = sidecar_path(file_path)
    if not os.path.exists(path):
        raise FormatError(f"Missing sidecar metadata file {path}")

    fields = parse_key_values(path)
    for key in required:
        if key not in fields:
            raise FormatError(f"Sidecar {path} has no '{key}' entry")
    return fields

def parse_key_values(path):
    fields = {}
    with open(path) as f:
        for line_num, line in enumerate(f, start=1):
            line = line.split('#', 1)[0].strip()
            if not line:
                continue
            if '=' not in line:
                raise FormatError(f"{path}:{line_num}: expected key=value, got '{line}'")
            key, value = line.split('=', 1)
            fields[key.strip()] = value.strip()
    return fields
