from . import __version__ as app_version

app_name = "guarded_owqa"
app_title = "Guarded OWQA"
app_description = "Certain answers for conjunctive queries under guarded TGDs with a side signature"
app_license = "MIT"

# Stages of `api.pipeline.answer`, run in this order. Each entry is a dotted path
# resolved at run time, so a stage can be swapped without touching the pipeline.
pipeline_stages = {
    "normalize": "guarded_owqa.preprocess.normalize.normalize_program",
    "saturate": "guarded_owqa.saturation.saturate.saturate",
    "fact_saturate": "guarded_owqa.saturation.fact_closure.fact_saturate",
    "linearize": "guarded_owqa.linear.linearizer.linearize",
    "decide": "guarded_owqa.linear.decide.decide_linear",
}

bench_suites = {
    "saturation-scaling": "guarded_owqa.api.bench.saturation_scaling",
    "fact-closure-scaling": "guarded_owqa.api.bench.fact_closure_scaling",
    "end-to-end": "guarded_owqa.api.bench.end_to_end",
}
