//! Command-line surface (under construction).
