#!/usr/bin/env python3
"""
Configuration Manager
=====================
Centralized configuration loading from .env file.
All krige modules import tolerances and defaults from this module.
"""

import os
from pathlib import Path
from dotenv import load_dotenv

# Load .env file from project root
PROJECT_ROOT = Path(__file__).parent
load_dotenv(PROJECT_ROOT / '.env')


class Config:
    """Numerical tolerances and tool defaults loaded from environment variables."""

    # ----- Matrix tolerances -----
    SYM_TOL: float = float(os.getenv('KRIGE_SYM_TOL', '1e-10'))
    DIAG_TOL: float = float(os.getenv('KRIGE_DIAG_TOL', '1e-10'))
    PSD_REL_TOL: float = float(os.getenv('KRIGE_PSD_REL_TOL', '1e-8'))
    RCOND_MIN: float = float(os.getenv('KRIGE_RCOND_MIN', '1e-14'))
    SM_SCALAR_TOL: float = float(os.getenv('KRIGE_SM_SCALAR_TOL', '1e-12'))
    BOUNDARY_TOL: float = float(os.getenv('KRIGE_BOUNDARY_TOL', '1e-12'))

    # ----- Estimation -----
    SIGMA_LIFT_MARGIN: float = float(os.getenv('KRIGE_SIGMA_LIFT_MARGIN', '1e-4'))

    # ----- Samplers -----
    REJECTION_MAX_DRAWS: int = int(os.getenv('KRIGE_REJECTION_MAX_DRAWS', '10000000'))
    REJECTION_BATCH: int = int(os.getenv('KRIGE_REJECTION_BATCH', '65536'))

    # ----- Output -----
    SECTION_POINTS: int = int(os.getenv('KRIGE_SECTION_POINTS', '256'))
    CSV_PRECISION: int = int(os.getenv('KRIGE_CSV_PRECISION', '17'))
    LOG_LEVEL: str = os.getenv('KRIGE_LOG_LEVEL', 'INFO').upper()

    @classmethod
    def validate(cls) -> bool:
        """Validate tolerances and budgets are usable."""
        errors = []

        for name in ('SYM_TOL', 'DIAG_TOL', 'PSD_REL_TOL', 'RCOND_MIN',
                     'SM_SCALAR_TOL', 'BOUNDARY_TOL', 'SIGMA_LIFT_MARGIN'):
            if not getattr(cls, name) > 0:
                errors.append(f"{name} must be positive")
        if cls.REJECTION_MAX_DRAWS < 1:
            errors.append("REJECTION_MAX_DRAWS must be at least 1")
        if cls.REJECTION_BATCH < 1:
            errors.append("REJECTION_BATCH must be at least 1")
        if cls.SECTION_POINTS < 3:
            errors.append("SECTION_POINTS must be at least 3")
        if not 1 <= cls.CSV_PRECISION <= 17:
            errors.append("CSV_PRECISION must be between 1 and 17")
        if cls.LOG_LEVEL not in ('DEBUG', 'INFO', 'WARNING', 'ERROR', 'CRITICAL'):
            errors.append(f"LOG_LEVEL '{cls.LOG_LEVEL}' is not a logging level")

        if errors:
            print("[CONFIG ERROR] Invalid configuration:")
            for error in errors:
                print(f"  - {error}")
            return False

        return True

    @classmethod
    def as_dict(cls) -> dict:
        return {
            'sym_tol': cls.SYM_TOL,
            'diag_tol': cls.DIAG_TOL,
            'psd_rel_tol': cls.PSD_REL_TOL,
            'rcond_min': cls.RCOND_MIN,
            'sm_scalar_tol': cls.SM_SCALAR_TOL,
            'boundary_tol': cls.BOUNDARY_TOL,
            'sigma_lift_margin': cls.SIGMA_LIFT_MARGIN,
            'rejection_max_draws': cls.REJECTION_MAX_DRAWS,
            'rejection_batch': cls.REJECTION_BATCH,
            'section_points': cls.SECTION_POINTS,
            'csv_precision': cls.CSV_PRECISION,
            'log_level': cls.LOG_LEVEL,
        }

    @classmethod
    def print_config(cls):
        """Print current configuration."""
        print("=" * 50)
        print("  KRIGE VARIOGRAM TOOLKIT - Configuration")
        print("=" * 50)
        print(f"  Symmetry tol:   {cls.SYM_TOL:g}")
        print(f"  Diagonal tol:   {cls.DIAG_TOL:g}")
        print(f"  PSD rel. tol:   {cls.PSD_REL_TOL:g}")
        print(f"  Min rcond:      {cls.RCOND_MIN:g}")
        print(f"  SM scalar tol:  {cls.SM_SCALAR_TOL:g}")
        print(f"  Boundary tol:   {cls.BOUNDARY_TOL:g}")
        print(f"  Sigma2 lift:    x(1 + {cls.SIGMA_LIFT_MARGIN:g})")
        print("-" * 50)
        print(f"  Rejection budget: {cls.REJECTION_MAX_DRAWS:,} draws")
        print(f"  Rejection batch:  {cls.REJECTION_BATCH:,}")
        print("-" * 50)
        print(f"  Section points: {cls.SECTION_POINTS}")
        print(f"  CSV digits:     {cls.CSV_PRECISION}")
        print(f"  Log level:      {cls.LOG_LEVEL}")
        print("=" * 50)


# Singleton config instance
config = Config()


if __name__ == "__main__":
    config.print_config()
    print()
    if config.validate():
        print("[OK] Configuration is valid")
    else:
        print("[FAIL] Configuration has errors")
