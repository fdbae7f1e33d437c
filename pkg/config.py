import os
from dotenv import load_dotenv

basedir = os.path.abspath(os.path.dirname(__file__))
load_dotenv(os.path.join(basedir, '.env'))

class Config:
    JOBS = int(os.environ.get('QREALITY_JOBS') or 1)
    MAX_BRANCHES = int(os.environ.get('QREALITY_MAX_BRANCHES') or 250000)
    LOG_LEVEL = os.environ.get('QREALITY_LOG_LEVEL') or 'WARNING'
    LOG_CONFIG = os.environ.get('QREALITY_LOG_CONFIG') or \
        os.path.join(basedir, 'logging.ini')

    # Largest n for which every coevent is enumerated
    MAX_ENUMERATION_N = 4
    # Largest n accepted by gen2/actualize censuses
    MAX_FILTER_N = 3
    SCHEMA_VERSION = 1
