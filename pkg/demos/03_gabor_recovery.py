"""
Coherent Gabor frames
=====================

With a highly coherent dictionary the synthesis coefficients are not
recovered, yet the signal is. A short batch of trials shows the spread.
"""

from optdual.experiment import ExperimentSpec, run_experiment

spec = ExperimentSpec(kind="gabor", m=32, n=128, oversampling=30, sparsity=7,
                      trials=5, seed=0)
records, summary = run_experiment(spec)

print("coherence:", round(summary["coherence"], 4))
print("trial  syn signal  syn coef  analysis")
for r in records:
    print("%5d  %10.4f  %8.4f  %8.4f" % (r.trial, r.synthesis_signal_error,
                                         r.synthesis_coef_error, r.analysis_signal_error))
m = summary["metrics"]
print("medians: signal %.4f, coefficients %.4f, analysis %.4f" % (
    m["synthesis_signal_error"]["median"], m["synthesis_coef_error"]["median"],
    m["analysis_signal_error"]["median"]))

# set out="results/gabor" on the ExperimentSpec to get trials.json, summary.csv and
# one decay_<trial>.csv per trial for plotting
