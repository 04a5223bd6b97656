"""Validated lifted planning model and the rewrites defined on it."""

from .analysis import analyze
from .core import (
    EQ,
    NEQ,
    NOT_TYPE,
    OBJECT,
    TYPE,
    ActionSchema,
    CompoundTaskSchema,
    Effect,
    GroundAtom,
    MethodSchema,
    Model,
    Parameter,
    PredicateDecl,
    Task,
    TaskNetwork,
    TypeHierarchy,
    VariableConstraint,
)
from .transform import OrderingError, check_partial_order, compile_method_preconditions, total_order_expand

__all__ = [
    "EQ",
    "NEQ",
    "NOT_TYPE",
    "OBJECT",
    "TYPE",
    "ActionSchema",
    "CompoundTaskSchema",
    "Effect",
    "GroundAtom",
    "MethodSchema",
    "Model",
    "OrderingError",
    "Parameter",
    "PredicateDecl",
    "Task",
    "TaskNetwork",
    "TypeHierarchy",
    "VariableConstraint",
    "analyze",
    "check_partial_order",
    "compile_method_preconditions",
    "total_order_expand",
]
