# evaluation/plotting.py
"""ROC plot export (headless)."""

from pathlib import Path
from typing import Optional, Union

import matplotlib
matplotlib.use("agg")
import matplotlib.pyplot as plt

from .metrics import RocCurve


def plot_roc(curve: RocCurve, path: Union[str, Path], title: Optional[str] = None) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 5))
    ax.plot([0, 1], [0, 1], linestyle="dashed", color="k", linewidth=1)
    ax.plot(curve.fpr, curve.tpr, linewidth=2, label=f"AUC = {curve.auc:.3f}")
    ax.set_xlabel("False Positive Rate")
    ax.set_ylabel("True Positive Rate")
    ax.set_xlim([0, 1])
    ax.set_ylim([0, 1])
    if title:
        ax.set_title(title)
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path
