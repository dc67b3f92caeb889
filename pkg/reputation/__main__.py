import sys

from reputation.main import main

sys.exit(main())
