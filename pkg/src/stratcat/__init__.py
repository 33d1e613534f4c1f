"""Exit-path categories of stratified spaces, computed at finite scale.

Modules:

* ``order`` - finite preorders, Alexandrov spaces, po-spaces, stratified maps
* ``category`` - thin and presented categories, localization, the ``RP^n`` skeleton
* ``groups`` - group presentations, coset enumeration, abelianization
* ``braid`` - braid words, Garside normal form, cabling, parabolic membership
* ``symprod`` - strata and exit paths of the symmetric product ``SP^n C``
* ``cosheaf`` - precosheaves, display spaces, spreads, cosheafification
* ``oracles`` - independent cross-checks used by the tests and the CLI
* ``config`` - run configurations for oracle suites and scripts
"""

__version__ = "0.1.0"
