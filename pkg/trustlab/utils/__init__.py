from .logs import logmsg, progressbar, set_logfile
