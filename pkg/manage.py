#!/usr/bin/env python
"""Command-line entry point for opmean (reports, reproductions, tests)."""
import os
import sys


def main():
    """Run opmean management commands."""
    os.environ.setdefault('DJANGO_SETTINGS_MODULE', 'config.settings')
    # BLAS reads its thread count when numpy is first imported.
    threads = os.environ.get('OPMEAN_THREADS')
    if threads:
        os.environ.setdefault('OMP_NUM_THREADS', threads)
        os.environ.setdefault('OPENBLAS_NUM_THREADS', threads)
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "Couldn't import Django. Install the pinned requirements "
            "(pip install -r requirements.txt) into the active environment."
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == '__main__':
    main()
