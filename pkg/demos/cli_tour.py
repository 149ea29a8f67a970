"""
The ccelab command line
=======================

Every subcommand reads JSON inputs from demos/data and writes JSON or CSV.
Exit status carries the verdict: 0 true, 1 false or not converged, 2 bad
input, 3 over a size cap, 4 method not applicable to the constraint.
"""
import json
import subprocess
import sys
from pathlib import Path

DATA = Path(__file__).resolve().parent / "data"


def ccelab(*args):
    argv = [sys.executable, "-m", "ccelab"] + [str(DATA / a) if a.endswith(".json") else a for a in args]
    done = subprocess.run(argv, capture_output=True, text=True)
    print("$ ccelab", " ".join(args), f"  [exit {done.returncode}]")
    return done


print(json.loads(ccelab("extend", "--game", "chicken.json", "--device", "chicken_device.json").stdout)["payoffs"][0])

rep = json.loads(ccelab("check", "--game", "chicken.json", "--device", "chicken_device.json",
                        "--constraint", "restricted_profiles.json", "--profile", "profile_s3_s4.json").stdout)
print(rep["verdict"], rep["witnesses"][0])

rep = json.loads(ccelab("check", "--game", "chicken.json", "--dist", '[0, "1/3", "1/3", "1/3"]').stdout)
print(rep["verdict"], rep["witnesses"][0])

out = ccelab("explore", "--game", "chicken.json", "--constraint", "sw12.json", "--resolution", "4").stdout
print("\n".join(out.splitlines()[:4]))

print(ccelab("fixed-point", "--game", "chicken.json", "--constraint", "sw12.json").stdout)
print(ccelab("fixed-point", "--game", "randomization_gap.json", "--constraint", "ac_positive.json").stderr)
