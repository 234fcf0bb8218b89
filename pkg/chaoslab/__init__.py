"""Exact verification engine for moment inequalities on Wiener chaos."""
