"""conceptforge: compose annotated code concepts into runnable programs.

A concept database holds snippet-backed building blocks arranged in a
generalization-specialization DAG. Users describe a solution as a
precedence graph of concept references; the engine resolves each
reference to its most specialized implementation, expands aggregates,
unifies the variable interfaces between snippets, and emits a single
runnable program.
"""

__version__ = "0.1.0"
