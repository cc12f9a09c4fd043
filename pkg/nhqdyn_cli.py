"""
nhqdyn
Entry point for the command-line runner
"""
from nhqdyn.commands import cli

# =========================
# RUN LOCAL
# =========================

if __name__ == "__main__":
    cli()
