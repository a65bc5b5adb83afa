"""safegcd modular inversion: exact divstep model, signed62 limb code, oracles."""

from safegcd._verify import VerifyError
from safegcd.divsteps62 import Trans2x2, divsteps_62_var
from safegcd.modinv64 import modinv64_var
from safegcd.refmath import DivstepState, TransMatrix, divstep, gcd_safegcd, modinv_ref, step_n
from safegcd.signed62 import ModInfo, Signed62, decode, encode, make_modinfo

__all__ = [
    "DivstepState",
    "ModInfo",
    "Signed62",
    "Trans2x2",
    "TransMatrix",
    "VerifyError",
    "decode",
    "divstep",
    "divsteps_62_var",
    "encode",
    "gcd_safegcd",
    "make_modinfo",
    "modinv64_var",
    "modinv_ref",
    "step_n",
]
