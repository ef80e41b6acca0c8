'''
algebra.py
Trust triples <td, dtd, ud> and the two monoids of trust:
sequential aggregation "." (seq) and parallel aggregation "+" (par)
'''

from collections import namedtuple
from functools import reduce

# tolerance on td + dtd above 1 that is still accepted (and rescaled)
SUM_TOLERANCE = 1e-9
# tiny negative components produced by round-off are clamped to 0
NEG_TOLERANCE = 1e-12


_Triple = namedtuple('_Triple', ['td', 'dtd'])


class TrustTriple(_Triple):
    ''' a trust relationship <td, dtd, ud> with td + dtd + ud = 1
    Only (td, dtd) are stored, the uncertainty is derived.
    PARAMETERS
        td:     (float) trust degree in [0,1]
        dtd:    (float) distrust degree in [0,1]
        ud:     (float, optional) uncertainty, checked against 1-td-dtd when given
    '''
    __slots__ = ()

    def __new__(cls, td, dtd=0.0, ud=None):
        td = float(td)
        dtd = float(dtd)
        if td != td or dtd != dtd:
            raise ValueError('TrustTriple: NaN component')
        if td < -NEG_TOLERANCE or dtd < -NEG_TOLERANCE:
            raise ValueError('TrustTriple: negative component in <%r, %r>' % (td, dtd))
        td = max(td, 0.0)
        dtd = max(dtd, 0.0)
        s = td + dtd
        if s > 1.0 + SUM_TOLERANCE:
            raise ValueError('TrustTriple: td + dtd = %r exceeds 1' % s)
        if s > 1.0:
            td = td / s
            dtd = min(dtd / s, 1.0 - td)
        if ud is not None:
            ud = float(ud)
            if abs(td + dtd + ud - 1.0) > SUM_TOLERANCE:
                raise ValueError('TrustTriple: <%r, %r, %r> does not sum to 1' % (td, dtd, ud))
        return _Triple.__new__(cls, td, dtd)

    @property
    def ud(self):
        return max(0.0, 1.0 - self.td - self.dtd)

    def as_tuple(self):
        return (self.td, self.dtd, self.ud)

    def __repr__(self):
        return 'TrustTriple(%r, %r, %r)' % (self.td, self.dtd, self.ud)

    def __mul__(self, other):
        return seq(self, other)

    def __add__(self, other):
        return par([self, other])


FULL_TRUST = TrustTriple(1.0, 0.0)
FULL_DISTRUST = TrustTriple(0.0, 1.0)
NO_RELATION = TrustTriple(0.0, 0.0)


def is_no_relation(x):
    ''' True if x is <0,0,1> (total uncertainty, i.e. no edge / no path)
    '''
    return x.td == 0.0 and x.dtd == 0.0


def from_counts(positive, negative, total):
    ''' trust triple from experience counts
    PARAMETERS
        positive:   (int) number of positive experiences (n)
        negative:   (int) number of negative experiences (l)
        total:      (int) number of encounters (m)
    RETURNS
        triple:     (TrustTriple) <n/m, l/m, 1-(n+l)/m>
    '''
    if total < 1:
        raise ValueError('from_counts: total must be >= 1, got %r' % (total,))
    if positive < 0 or negative < 0:
        raise ValueError('from_counts: counts must be non negative')
    if positive + negative > total:
        raise ValueError('from_counts: %d positive + %d negative exceed %d encounters'
                         % (positive, negative, total))
    return TrustTriple(positive / total, negative / total)


def seq(x, y):
    ''' sequential aggregation x.y (trust along the path a -x-> b -y-> c)
    '''
    return TrustTriple(x.td * y.td + x.dtd * y.dtd,
                       x.dtd * y.td + x.td * y.dtd)


def _par2(x, y):
    return TrustTriple(x.td + (1.0 - x.td) * y.td, x.dtd * y.dtd)


def par(xs):
    ''' parallel aggregation x1 + x2 + ... over disjoint paths
    PARAMETERS
        xs:     (list of TrustTriple) nonempty; folded from the left
    RETURNS
        triple: (TrustTriple) <1 - prod(1-td_i), prod(dtd_i), remainder>
    '''
    xs = list(xs)
    if len(xs) == 0:
        raise ValueError('par: empty list (use NO_RELATION for "no paths")')
    return reduce(_par2, xs)


def seq_path(xs):
    ''' sequential aggregation over a whole path, f(t1..tn) = f(f(t1..tn-1), tn)
    '''
    xs = list(xs)
    if len(xs) == 0:
        raise ValueError('seq_path: empty path')
    return reduce(seq, xs)


def parse_triple(text):
    ''' parse "td,dtd" or "td,dtd,ud"
    '''
    parts = [p.strip() for p in text.split(',')]
    if len(parts) not in (2, 3):
        raise ValueError('parse_triple: expected "td,dtd[,ud]", got %r' % text)
    try:
        values = [float(p) for p in parts]
    except ValueError:
        raise ValueError('parse_triple: not a number in %r' % text)
    return TrustTriple(*values)


def format_triple(x):
    return '%r,%r' % (x.td, x.dtd)
