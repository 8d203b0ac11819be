"""Superoperators, Choi matrices and the CP / coCP tests on small examples."""
import numpy as np

from divdyn.engine import check_cocp
from divdyn.linalg import (choi_of, identity_superop, is_psd, kraus_from_choi, partial_transpose,
                           superop_from_function, transpose_superop)

maps = {
    "identity": identity_superop(2),
    "transpose": transpose_superop(2),
    "depolarize": superop_from_function(lambda x: np.trace(x) * np.eye(2) / 2, 2),
}
for name, s in maps.items():
    c = choi_of(s)
    print(f"{name:10s} Choi spectrum {np.round(np.linalg.eigvalsh(c), 3)}  "
          f"CP={is_psd(c)}  coCP={check_cocp(s)}  PT spectrum {np.round(np.linalg.eigvalsh(partial_transpose(c)), 3)}")

ops = kraus_from_choi(choi_of(maps["depolarize"]))
print(f"\ndepolarizing channel: {len(ops)} Kraus operators")
