import enum


class CriterionEnum(enum.Enum):
    EHVI = "ehvi"
    POI = "poi"

    @classmethod
    def from_string(cls, value: str):
        try:
            return cls(value.lower())
        except ValueError:
            raise ValueError(f"'{value}' is not a valid CriterionEnum member")


class FrontKindEnum(enum.Enum):
    CONCAVE_SPHERICAL = "concave_spherical"
    CONVEX_SPHERICAL = "convex_spherical"

    @classmethod
    def from_string(cls, value: str):
        try:
            return cls(value.lower().replace("-", "_"))
        except ValueError:
            raise ValueError(f"'{value}' is not a valid FrontKindEnum member")
