import pandas as pd

from .evaluation import EvaluationResult



class DfFactory(object):
    """
    Helper class containing methods for creating dataframes from detector output

    The data passed to its methods are eacj objects: junctions, evaluation results, run reports.
    """

    def df_junctions(self, junctions):
        """One row per junction. Branch orientations and scales are joined as strings."""
        rows = []
        for j in junctions:
            rows.append({
                "t": j.t,
                "x": j.x,
                "y": j.y,
                "kind": j.kind,
                "M": j.M,
                "nfa": j.nfa,
                "scales": " ".join(str(b.r) for b in j.branches),
                "orientations": " ".join("%.6f" % b.theta for b in j.branches),
            })
        return pd.DataFrame(rows, columns=["t", "x", "y", "kind", "M", "nfa", "scales", "orientations"])


    def df_branches(self, junctions):
        """Utility
        Returns one row per branch, with the junction timestamp and position repeated.
        """
        rows = []
        for i, j in enumerate(junctions):
            for b in j.branches:
                rows.append({"junction": i, "t": j.t, "x": j.x, "y": j.y,
                             "r": b.r, "theta": b.theta, "strength": b.strength,
                             "J": b.J, "tail": b.tail, "nfa": b.nfa})
        return pd.DataFrame(rows, columns=["junction", "t", "x", "y", "r", "theta",
                                           "strength", "J", "tail", "nfa"])


    def df_labels(self, result):
        """Per-item labels of an EvaluationResult: detections first, then non-detected events."""
        rows = []
        for item, label, d in result.detections:
            rows.append({"item": "junction", "t": item.t, "x": item.x, "y": item.y,
                         "label": label, "distance": d})
        for item, label, d in result.events:
            rows.append({"item": "event", "t": item.t, "x": item.x, "y": item.y,
                         "label": label, "distance": d})
        return pd.DataFrame(rows, columns=["item", "t", "x", "y", "label", "distance"])


    def df_metrics(self, results):
        """One row per scene with counts, fpr and accuracy (NaN when undefined)."""
        if isinstance(results, EvaluationResult):
            results = [results]
        rows = []
        for r in results:
            c = r.counts
            rows.append({"scene": r.scene, "TP": c.TP, "FP": c.FP, "TN": c.TN, "FN": c.FN,
                         "fpr": r.fpr, "accuracy": r.accuracy})
        return pd.DataFrame(rows, columns=["scene", "TP", "FP", "TN", "FN", "fpr", "accuracy"])


    def df_run_report(self, report):
        """Stage counts and wall clock of a RunReport, indexed by stage."""
        if not report.timings:
            print("[Warning] Run report has no timings.")
        stages = ["ingest", "filter", "detect", "refine"]
        rows = []
        counts = {"ingest": report.events, "filter": report.candidates,
                  "detect": report.detections, "refine": report.accepted}
        for s in stages:
            rows.append({"stage": s, "count": counts[s], "seconds": report.timings.get(s, 0.0)})
        return pd.DataFrame(rows, columns=["stage", "count", "seconds"]).set_index("stage")
