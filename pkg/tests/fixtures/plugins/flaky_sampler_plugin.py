#!/usr/bin/env python3
"""Sampler plugin that dies abruptly after N asks (argv[1], default 5).

Used to exercise mid-run plugin death: the host must fail fast, the study
must keep its journal prefix, and the CLI must exit 3.
"""

import json
import os
import random
import sys


def main():
    die_after = int(sys.argv[1]) if len(sys.argv) > 1 else 5
    asks = 0
    for line in sys.stdin:
        msg = json.loads(line)
        kind = msg["type"]
        if kind == "hello":
            reply = {"type": "hello_ack", "protocol": 1, "capabilities": ["sampler"]}
        elif kind == "ask":
            asks += 1
            if asks > die_after:
                os._exit(1)  # simulate a crash: no reply, no cleanup
            rng = random.Random(msg["trial_id"])
            params = {}
            for p in msg["search_space"]["params"]:
                if p["kind"] == "float":
                    params[p["name"]] = rng.uniform(p["low"], p["high"])
                elif p["kind"] == "int":
                    params[p["name"]] = rng.randint(p["low"], p["high"])
                else:
                    params[p["name"]] = rng.choice(p["choices"])
            reply = {"type": "params", "trial_id": msg["trial_id"], "params": params}
        elif kind == "tell":
            reply = {"type": "tell_ack", "trial_id": msg["trial_id"]}
        elif kind == "shutdown":
            return
        else:
            reply = {"type": "error", "code": "unsupported", "message": f"cannot handle {kind!r}"}
        sys.stdout.write(json.dumps(reply) + "\n")
        sys.stdout.flush()


if __name__ == "__main__":
    main()
