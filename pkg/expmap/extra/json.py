import dataclasses
import json
from fractions import Fraction

import numpy as np
from django.core.serializers.json import DjangoJSONEncoder

from expmap.core.symbolic import ExternalAddress, IntermediateAddress, KneadingSequence


class CustomJSONEncoder(DjangoJSONEncoder):
    def default(self, o):
        if isinstance(o, complex):
            return {"re": o.real, "im": o.imag}
        if isinstance(o, (ExternalAddress, IntermediateAddress)):
            return str(o)
        if isinstance(o, KneadingSequence):
            return [str(symbol) for symbol in o.preperiod + o.period]
        if isinstance(o, Fraction):
            return str(o)
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, np.ndarray):
            return o.tolist()
        if dataclasses.is_dataclass(o) and not isinstance(o, type):
            return {field.name: getattr(o, field.name) for field in dataclasses.fields(o)}
        return super().default(o)


def dumps(data):
    """Deterministic json: sorted keys and fixed indentation."""
    return json.dumps(data, cls=CustomJSONEncoder, sort_keys=True, indent=2) + "\n"
