#!/usr/bin/env python3
"""Extract the Spider dev split into the layout consumed by `astres ingest`.

Input is a directory holding Spider's dev.json and tables.json plus a
tables_for_natsql.json file (as shipped by the dbgpt-hub sdist), whose
`data_samples` field carries a handful of sampled values per column.

Output directory receives:
  dev.json     -- [{db_id, question, query}]
  tables.json  -- the standard Spider schema records for the dev databases
  values.json  -- {db_id: {"table.column": [value, ...]}}
"""
import argparse
import json
import pathlib

SCHEMA_KEYS = ("db_id", "table_names_original", "table_names", "column_names_original",
               "column_names", "column_types", "primary_keys", "foreign_keys")


def fmt(v):
    if isinstance(v, float) and v.is_integer():
        return str(int(v))
    return str(v)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("src")
    ap.add_argument("dst")
    args = ap.parse_args()
    src, dst = pathlib.Path(args.src), pathlib.Path(args.dst)
    dst.mkdir(parents=True, exist_ok=True)

    dev = json.loads((src / "dev.json").read_text())
    dev_dbs = sorted({s["db_id"] for s in dev})
    tables = {t["db_id"]: t for t in json.loads((src / "tables.json").read_text())}
    natsql = {t["db_id"]: t for t in json.loads((src / "tables_for_natsql.json").read_text())}

    samples = [{"db_id": s["db_id"], "question": s["question"], "query": s["query"]} for s in dev]
    (dst / "dev.json").write_text(json.dumps(samples, indent=1, ensure_ascii=False) + "\n")

    schemas = [{k: tables[db][k] for k in SCHEMA_KEYS} for db in dev_dbs]
    (dst / "tables.json").write_text(json.dumps(schemas, indent=1, ensure_ascii=False) + "\n")

    values = {}
    for db in dev_dbs:
        nt = natsql[db]
        per_column = {}
        for (ti, col), vals in zip(nt["column_names_original"], nt["data_samples"]):
            if ti < 0 or col == "*":
                continue
            seen = []
            for v in vals:
                s = fmt(v)
                if s not in seen:
                    seen.append(s)
            per_column[nt["table_names_original"][ti] + "." + col] = seen
        values[db] = per_column
    (dst / "values.json").write_text(json.dumps(values, indent=1, ensure_ascii=False) + "\n")


if __name__ == "__main__":
    main()
