import os
import sys

# make the test-local oracle module importable regardless of import mode
sys.path.insert(0, os.path.dirname(__file__))
