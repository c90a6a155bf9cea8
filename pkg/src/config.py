"""
Configuration settings for the nodal curve toolkit
"""
import os
from dotenv import load_dotenv

# Load environment variables
load_dotenv()

# Subcurve enumeration
VERTEX_CAP = int(os.getenv("NODAL_VERTEX_CAP", "25"))  # 2^25 subsets is already slow

# Random corpus (verify defaults)
DEFAULT_SEED = int(os.getenv("NODAL_SEED", "0"))
RANDOM_CURVES = int(os.getenv("NODAL_RANDOM_CURVES", "500"))
RANDOM_GSTABLE_CURVES = int(os.getenv("NODAL_RANDOM_GSTABLE_CURVES", "500"))
SESHADRI_TRIPLES = int(os.getenv("NODAL_SESHADRI_TRIPLES", "200"))

# Random curve generator
MAX_RANDOM_VERTICES = 8
MAX_RANDOM_GENUS = 3
MAX_EXTRA_EDGES = 3
MAX_LABELED_POINTS = 2
MAX_REJECTIONS = 2000

# Brute-force bounds
JH_EXHAUSTIVE_MAX_VERTICES = 6
SPINE_ENUM_MAX_VERTICES = 6

# Report cache
REPORT_CACHE_SIZE = int(os.getenv("NODAL_REPORT_CACHE_SIZE", "5000"))

# Parallel subset scans
DEFAULT_JOBS = int(os.getenv("NODAL_JOBS", "1"))

# Logging
LOG_LEVEL = os.getenv("NODAL_LOG_LEVEL", "WARNING")
