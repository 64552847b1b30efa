# config.py - Intent IDS toolkit configuration

import os
from pathlib import Path

# Load .env file if present
try:
    from dotenv import load_dotenv
    env_path = Path(__file__).parent / '.env'
    if env_path.exists():
        load_dotenv(env_path)
except ImportError:
    pass  # dotenv not installed, use environment variables directly


def _env_int(name: str, default: int) -> int:
    value = os.getenv(name)
    if value is None or value.strip() == "":
        return default
    return int(value)


TOOL_NAME = "intentsec"
TOOL_VERSION = "0.3.0"

# ============================================
# RUNTIME
# ============================================
DEFAULT_SEED = _env_int("INTENTSEC_SEED", 42)
DEFAULT_WORKERS = _env_int("INTENTSEC_WORKERS", 1)
LOG_LEVEL = os.getenv("INTENTSEC_LOG_LEVEL", "INFO")
RUNS_DIR = os.getenv("INTENTSEC_RUNS_DIR", "runs")

# Fixed-width float formatting for every numeric report field
REPORT_FLOAT_FORMAT = "{:.6f}"

# ============================================
# MANIFEST INGEST
# ============================================
ANDROID_NS = "http://schemas.android.com/apk/res/android"
LABELS_HEADER = ("app_id", "label")
MANIFEST_SUFFIX = ".xml"

# ============================================
# FEATURES
# ============================================
DEFAULT_BINARIZE = True
DEFAULT_TRAIN_FRACTION = 0.7

# ============================================
# NEURAL CORE
# ============================================
# Output clamp applied before the log in binary cross-entropy
BCE_EPSILON = 1e-7

OPTIMIZER_DEFAULTS = {
    "rmsprop": {"learning_rate": 0.001, "rho": 0.9, "epsilon": 1e-8},
    "adam": {"learning_rate": 0.001, "beta1": 0.9, "beta2": 0.999, "epsilon": 1e-8},
    # Adadelta is learning-rate free; 1.0 scales the raw update
    "adadelta": {"learning_rate": 1.0, "rho": 0.95, "epsilon": 1e-6},
}

TRAIN_DEFAULTS = {
    "epochs": 100,
    "batch_size": 1024,
    "shuffle_each_epoch": True,
    "log_every": 50,
}

# ============================================
# SWEEP
# ============================================
# MLP used to score AE candidates during the AE search stages
STANDARD_MLP = {
    "hidden_layers": [64, 64],
    "train": {"epochs": 100, "batch_size": 1024},
    "optimizer": {"kind": "adadelta"},
}

# AUC tolerance for the default stage elimination predicate
STAGE_AUC_DELTA = 0.05

# ============================================
# BEST END-TO-END CONFIGURATION (Conf. 40)
# ============================================
BEST_E2E = {
    "conf_id": 40,
    "ae": {
        "hidden_layers": [128, 64],
        "embedding_dim": 32,
        "train": {"epochs": 1000, "batch_size": 1024},
        "optimizer": {"kind": "rmsprop"},
    },
    "mlp": {
        "hidden_layers": [64, 64, 64, 64],
        "train": {"epochs": 1000, "batch_size": 1024},
        "optimizer": {"kind": "rmsprop"},
    },
}

# ============================================
# SYNTHETIC CORPUS
# ============================================
SYNTH = {
    "n_mal": 200,
    "n_ben": 200,
    "vocab_size": 32,
    "n_informative": 8,
    "gap": 0.6,
    "base_rate": 0.15,
    "max_repeat": 1,
    "package_prefix": "com.synth.app",
}

# ============================================
# RUN ARCHIVE / R2 STORAGE SETTINGS
# ============================================
# Cloudflare R2 (or any S3-compatible) storage for run archives
R2_ENDPOINT_URL = os.getenv("R2_ENDPOINT_URL")
R2_ACCESS_KEY_ID = os.getenv("R2_ACCESS_KEY_ID")
R2_SECRET_ACCESS_KEY = os.getenv("R2_SECRET_ACCESS_KEY")
R2_BUCKET_NAME = os.getenv("R2_BUCKET_NAME", "intentsec-runs")
ARCHIVE_OUTPUT_DIR = "run_archives"
