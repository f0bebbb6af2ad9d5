"""Joint IRS phase-shift and MU-MIMO precoder optimization with DDPG-style learners."""

__version__ = "0.1.0"
