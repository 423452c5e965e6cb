import sys

from fuzzcut.cli import main

sys.exit(main())
