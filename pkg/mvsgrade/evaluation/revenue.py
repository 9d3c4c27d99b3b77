import numbers
from decimal import Decimal, ROUND_HALF_UP


def _decimal(value, name):
    if isinstance(value, Decimal):
        result = value
    elif isinstance(value, numbers.Integral):
        result = Decimal(int(value))
    else:
        result = Decimal(repr(float(value)))
    if result < 0:
        raise ValueError('%s must be non-negative, got %s' % (name, value))
    return result


def accuracy_gain(machine_accuracy, human_accuracy):
    """
    Machine minus human accuracy, computed on the printed decimals so that
    0.86 - 0.73 gives exactly 0.13.
    """
    return float(Decimal(repr(float(machine_accuracy))) -
                 Decimal(repr(float(human_accuracy))))


def revenue_gain(daily_volume, accuracy_delta, unit_price):
    """
    Extra correctly graded items per day, rounded half up, and the revenue
    they bring at `unit_price` each.
    :return: (items, revenue)
    """
    volume = _decimal(daily_volume, 'daily_volume')
    delta = _decimal(accuracy_delta, 'accuracy_delta')
    price = _decimal(unit_price, 'unit_price')
    items = int((volume * delta).quantize(Decimal(1), rounding=ROUND_HALF_UP))
    revenue = items * price
    if revenue == revenue.to_integral_value():
        return items, int(revenue)
    return items, float(revenue)
