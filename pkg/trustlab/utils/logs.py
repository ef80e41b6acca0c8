## @file
#  timestamped log lines and a text progress bar

import datetime
import sys

_logfile = None


def set_logfile(path):
    ''' append every logged line to `path` as well (None to disable)
    '''
    global _logfile
    _logfile = path


def logmsg(msg):
    ts = datetime.datetime.now().strftime("%Y-%m-%d %H:%M:%S")
    print('[%s] %s' % (ts, msg))
    sys.stdout.flush()
    if _logfile is not None:
        with open(_logfile, 'a') as f:
            f.write('[%s] %s\n' % (ts, msg))


def progressbar(count, total, status=''):
    bar_len = 60
    filled_len = int(round(bar_len * count / float(max(total, 1))))

    percents = round(100.0 * count / float(max(total, 1)), 1)
    bar = '=' * filled_len + '-' * (bar_len - filled_len)

    sys.stdout.write('[%s] %s%s ...%s\r' % (bar, percents, '%', status))
    if count >= total:
        sys.stdout.write('\n')
    sys.stdout.flush()
