// Generated by tools/gen_erfc_table.py; do not edit by hand.
#pragma once

#include <array>

namespace sosbm::detail {

struct ChebyshevPiece {
  double lo;
  double hi;
  int degree;
  const double* coeffs;
};

inline constexpr std::array<double, 17> kErfcxPiece0 = {
    7.8897420432983187579e-1,
    -1.9054959076559183091e-1,
    1.8748766414046565944e-2,
    -1.5967385395194617784e-3,
    1.2165370853879293233e-4,
    -8.4655607079541557341e-6,
    5.4576345805536025649e-7,
    -3.2936085321716833058e-8,
    1.8753468988852800293e-9,
    -1.0137357663517625984e-10,
    5.2284505652553844282e-12,
    -2.5835414602093492351e-13,
    1.2273025246362479888e-14,
    -5.6215578912286297107e-16,
    2.4890188568030207997e-17,
    -1.0676302350281890105e-18,
    4.4450109277141139483e-20,
};

inline constexpr std::array<double, 16> kErfcxPiece1 = {
    5.1425403004481406046e-1,
    -9.3534361576316468843e-2,
    7.3495435679659606601e-3,
    -5.1702876831709545028e-4,
    3.3274891810398319227e-5,
    -1.987760941931570404e-6,
    1.1137198399251980756e-7,
    -5.8986496093891293051e-9,
    2.9712990142852804919e-10,
    -1.4304881857762570755e-11,
    6.608616284265576782e-13,
    -2.9395552899978546082e-14,
    1.26250285403891568e-15,
    -5.2483535009959203539e-17,
    2.1162858025358236955e-18,
    -8.2926417238271743444e-20,
};

inline constexpr std::array<double, 19> kErfcxPiece2 = {
    3.3142728163945198303e-1,
    -8.5002137706743194168e-2,
    9.9511273414661154111e-3,
    -1.0810888102208325048e-3,
    1.1023243631194950258e-4,
    -1.0636830518218601001e-5,
    9.7750126804790563943e-7,
    -8.5979228678883160072e-8,
    7.2677084117248423455e-9,
    -5.9235438405925421095e-10,
    4.6683928572294156695e-11,
    -3.5661277015677501653e-12,
    2.6458779519104522156e-13,
    -1.9101658673527566022e-14,
    1.3439765884798289381e-15,
    -9.2287905490943258079e-17,
    6.1926730846439105629e-18,
    -4.0652224326488764456e-19,
    2.6134159338163425518e-20,
};

inline constexpr std::array<double, 22> kErfcxPiece3 = {
    1.8742956902622409307e-1,
    -5.7946528836690967785e-2,
    8.5952473873965326996e-3,
    -1.2284613640242593737e-3,
    1.6974366686180486953e-4,
    -2.2738329337044562795e-5,
    2.9598443788048780997e-6,
    -3.7513575581379711372e-7,
    4.6372828761738247083e-8,
    -5.5994553925640879241e-9,
    6.6131608966799159755e-10,
    -7.6482715221998167747e-11,
    8.6709043258765937469e-12,
    -9.6454562743821085143e-13,
    1.0536827959360625658e-13,
    -1.1312630906760667228e-14,
    1.1945180669174575961e-15,
    -1.241310752580407046e-16,
    1.2702463231854360038e-17,
    -1.2807258736638549485e-18,
    1.2729426443953687907e-19,
    -1.2478254325277601886e-20,
};

inline constexpr std::array<double, 24> kErfcxPiece4 = {
    9.7995575568621981351e-2,
    -3.2617162422838792451e-2,
    5.3544445130489407849e-3,
    -8.6750856176183861541e-4,
    1.3878345773329890299e-4,
    -2.1933248302183236372e-5,
    3.4257168244107047131e-6,
    -5.289955530513348054e-7,
    8.0790765275379452147e-8,
    -1.2207511691612987771e-8,
    1.8255151508559987005e-9,
    -2.7024969193563975556e-10,
    3.9617523035370554013e-11,
    -5.7526190432002360784e-12,
    8.2757528913825952437e-13,
    -1.1798167744445411993e-13,
    1.6671816868045592073e-14,
    -2.3356287455465851199e-15,
    3.2446200044957892861e-16,
    -4.4703901732067544024e-17,
    6.1098011122762602569e-18,
    -8.2848306812744154898e-19,
    1.1147734317571118791e-19,
    -1.4886902126113346132e-20,
};

// z*sqrt(pi)*exp(z^2)*erfc(z) as a function of s = 1/z on [0, 1/8].
inline constexpr std::array<double, 16> kErfcxTail = {
    9.9711883920322325963e-1,
    -3.8287789927597038617e-3,
    -9.3814745827028797163e-4,
    1.0724159470980113834e-5,
    1.2198877713512134405e-6,
    -3.5951401481945856021e-8,
    -2.28107138871937683e-9,
    1.4136213158106286537e-10,
    4.4050465398959885472e-12,
    -6.1890689622508076393e-13,
    -2.051022461358986132e-15,
    2.8472431318895696297e-15,
    -7.6944078716021404649e-17,
    -1.2671665468480876814e-17,
    8.8916603753903602067e-19,
    4.460108013272279064e-20,
};

inline constexpr std::array<ChebyshevPiece, 5> kErfcxPieces = {{
    {0, 0.5, 16, kErfcxPiece0.data()},
    {0.5, 1, 15, kErfcxPiece1.data()},
    {1, 2, 18, kErfcxPiece2.data()},
    {2, 4, 21, kErfcxPiece3.data()},
    {4, 8, 23, kErfcxPiece4.data()},
}};

}  // namespace sosbm::detail
