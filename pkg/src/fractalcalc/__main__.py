import sys

from fractalcalc.cli import main

sys.exit(main())
