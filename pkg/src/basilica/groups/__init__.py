from .enumerate import EnumerationResult, closure, m_histogram, set_threads, sweep
from .generators import alpha, beta, epsilon, generator, identity, lam, power, theta
from .orders import order_formula
from .predicates import GroupSelector, is_in_B, is_in_E, is_in_frattini, is_in_M, is_member
