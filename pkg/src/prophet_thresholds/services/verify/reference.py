"""Reference values of varphi_k(k + l), rounded to 4 decimals (rows k = 9..30, columns l = 1..11)."""

VARPHI_K_VALUES = tuple(range(9, 31))
VARPHI_L_VALUES = tuple(range(1, 12))

VARPHI_REFERENCE = {
    9: (0.1159, 0.1164, 0.1179, 0.1193, 0.1206, 0.1216, 0.1225, 0.1233, 0.1239, 0.1245, 0.1250),
    10: (0.1059, 0.1068, 0.1086, 0.1102, 0.1116, 0.1128, 0.1138, 0.1147, 0.1154, 0.1161, 0.1167),
    11: (0.0975, 0.0987, 0.1006, 0.1024, 0.1039, 0.1052, 0.1063, 0.1073, 0.1081, 0.1088, 0.1095),
    12: (0.0904, 0.0917, 0.0938, 0.0956, 0.0973, 0.0986, 0.0998, 0.1008, 0.1017, 0.1025, 0.1032),
    13: (0.0842, 0.0857, 0.0878, 0.0897, 0.0914, 0.0928, 0.0941, 0.0951, 0.0961, 0.0969, 0.0976),
    14: (0.0788, 0.0804, 0.0826, 0.0845, 0.0862, 0.0877, 0.0890, 0.0901, 0.0910, 0.0919, 0.0927),
    15: (0.0741, 0.0758, 0.0779, 0.0799, 0.0816, 0.0831, 0.0844, 0.0855, 0.0865, 0.0874, 0.0882),
    16: (0.0699, 0.0716, 0.0738, 0.0758, 0.0775, 0.0790, 0.0803, 0.0814, 0.0825, 0.0834, 0.0842),
    17: (0.0662, 0.0679, 0.0701, 0.0720, 0.0738, 0.0753, 0.0766, 0.0777, 0.0788, 0.0797, 0.0805),
    18: (0.0628, 0.0645, 0.0667, 0.0687, 0.0704, 0.0719, 0.0732, 0.0744, 0.0754, 0.0763, 0.0772),
    19: (0.0597, 0.0615, 0.0636, 0.0656, 0.0673, 0.0688, 0.0701, 0.0713, 0.0723, 0.0733, 0.0741),
    20: (0.0570, 0.0588, 0.0609, 0.0628, 0.0645, 0.0660, 0.0673, 0.0684, 0.0695, 0.0704, 0.0713),
    21: (0.0545, 0.0562, 0.0583, 0.0602, 0.0619, 0.0633, 0.0647, 0.0658, 0.0669, 0.0678, 0.0687),
    22: (0.0522, 0.0539, 0.0560, 0.0578, 0.0595, 0.0609, 0.0622, 0.0634, 0.0644, 0.0654, 0.0662),
    23: (0.0501, 0.0518, 0.0538, 0.0556, 0.0573, 0.0587, 0.0600, 0.0612, 0.0622, 0.0631, 0.0640),
    24: (0.0481, 0.0498, 0.0518, 0.0536, 0.0552, 0.0567, 0.0579, 0.0591, 0.0601, 0.0610, 0.0619),
    25: (0.0463, 0.0480, 0.0499, 0.0517, 0.0533, 0.0547, 0.0560, 0.0571, 0.0581, 0.0591, 0.0599),
    26: (0.0446, 0.0463, 0.0482, 0.0500, 0.0515, 0.0529, 0.0542, 0.0553, 0.0563, 0.0572, 0.0581),
    27: (0.0431, 0.0447, 0.0466, 0.0483, 0.0499, 0.0512, 0.0525, 0.0536, 0.0546, 0.0555, 0.0564),
    28: (0.0416, 0.0432, 0.0451, 0.0468, 0.0483, 0.0497, 0.0509, 0.0520, 0.0530, 0.0539, 0.0547),
    29: (0.0403, 0.0419, 0.0437, 0.0453, 0.0468, 0.0482, 0.0494, 0.0505, 0.0515, 0.0524, 0.0532),
    30: (0.0390, 0.0406, 0.0423, 0.0440, 0.0455, 0.0468, 0.0480, 0.0491, 0.0500, 0.0509, 0.0517),
}
