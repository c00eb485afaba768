"""
快照收敛可视化
把各事件对的快照偏差按阶段画在对数坐标上，并叠加 K/n² 上界
"""

import math
import os
from datetime import datetime
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from core.bridge import SnapshotStudy


def log10_fraction(q: Fraction) -> float:
    """正有理数的 log10；分子分母可以是任意大整数"""
    if q <= 0:
        raise ValueError("log10 needs a positive rational")
    return math.log10(q.numerator) - math.log10(q.denominator)


class ConvergencePlotter:
    """快照偏差收敛图"""

    def __init__(self, output_dir: str = "./output/plots"):
        self.output_dir = output_dir

    def series(self, study: SnapshotStudy) -> Dict[Tuple[Tuple[str, ...], Tuple[str, ...]], List[Tuple[int, Fraction]]]:
        """按事件对分组的 (阶段, 偏差)"""
        grouped: Dict = {}
        for row in study.rows:
            grouped.setdefault((row.event, row.given), []).append((row.stage, row.deviation))
        return grouped

    def plot(self, study: SnapshotStudy, save_path: Optional[str] = None, max_pairs: int = 12) -> str:
        """保存收敛图

        偏差恒为 0 的事件对不画（对数坐标下无意义），只在标题中计数。

        Returns:
            图片路径
        """
        if not save_path:
            timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
            save_path = os.path.join(self.output_dir, f"snapshot_convergence_{timestamp}.png")
        directory = os.path.dirname(save_path)
        if directory:
            os.makedirs(directory, exist_ok=True)

        fig, ax = plt.subplots(figsize=(10, 6))
        stages = np.array(study.stages, dtype=float)
        exact_pairs = 0
        drawn = 0
        for (event, given), points in self.series(study).items():
            nonzero = [(n, d) for n, d in points if d > 0]
            if not nonzero:
                exact_pairs += 1
                continue
            if drawn >= max_pairs:
                continue
            xs = np.array([n for n, _ in nonzero], dtype=float)
            ys = np.array([log10_fraction(d) for _, d in nonzero])
            label = f"P({'|'.join(event) or '∅'} | {'|'.join(given)})"
            ax.plot(xs, ys, marker="o", label=label)
            drawn += 1

        bound = np.array([log10_fraction(study.bound / (n * n)) for n in study.stages])
        ax.plot(stages, bound, linestyle="--", color="black", label="K/n²")

        ax.set_xscale("log", base=2)
        ax.set_xlabel("stage n")
        ax.set_ylabel("log10 |snapshot − standard part|")
        ax.set_title(f"Snapshot convergence ({exact_pairs} pairs exact at every stage)")
        ax.grid(True, alpha=0.3)
        ax.legend(fontsize=8)

        plt.tight_layout()
        plt.savefig(save_path, dpi=150, bbox_inches="tight")
        plt.close(fig)
        return save_path
