//! Bulk free energy and finite-size corrections (under construction).
